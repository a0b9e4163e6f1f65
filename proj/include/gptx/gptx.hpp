#pragma once

// Goal-plan tree explanations: tree model, trace generation, full and
// contrastive explanation engines, random-tree benchmarks.

#define GPTX_VERSION "0.1.0"

#include "gptx/error.hpp"
#include "gptx/eval.hpp"
#include "gptx/explain.hpp"
#include "gptx/factor.hpp"
#include "gptx/rng.hpp"
#include "gptx/trace.hpp"
#include "gptx/tree.hpp"
#include "gptx/tree_io.hpp"
#include "gptx/treegen.hpp"
