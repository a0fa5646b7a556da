#pragma once

#include "entropykit/alphabet.hpp"
#include "entropykit/commands.hpp"
#include "entropykit/entropy.hpp"
#include "entropykit/error.hpp"
#include "entropykit/events.hpp"
#include "entropykit/feature_table.hpp"
#include "entropykit/markov.hpp"
#include "entropykit/neep.hpp"
#include "entropykit/pipeline.hpp"
#include "entropykit/random.hpp"
#include "entropykit/synthetic.hpp"
#include "entropykit/time.hpp"
#include "entropykit/validation.hpp"
