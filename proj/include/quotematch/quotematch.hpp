#pragma once

#include "quotematch/error.hpp"
#include "quotematch/utf8.hpp"
#include "quotematch/textnorm.hpp"
#include "quotematch/hash.hpp"
#include "quotematch/io.hpp"
#include "quotematch/corpus.hpp"
#include "quotematch/minhash.hpp"
#include "quotematch/lsh_index.hpp"
#include "quotematch/matcher.hpp"
#include "quotematch/stats.hpp"
#include "quotematch/behavior.hpp"
#include "quotematch/features.hpp"
#include "quotematch/logit.hpp"
#include "quotematch/report.hpp"
#include "quotematch/synth.hpp"
#include "quotematch/pipeline.hpp"
