#pragma once

#include "natlearn/bench.hpp"
#include "natlearn/csv.hpp"
#include "natlearn/dataset.hpp"
#include "natlearn/error.hpp"
#include "natlearn/explain.hpp"
#include "natlearn/metrics.hpp"
#include "natlearn/model.hpp"
#include "natlearn/model_io.hpp"
#include "natlearn/neighbor_index.hpp"
#include "natlearn/oracle.hpp"
#include "natlearn/parallel.hpp"
#include "natlearn/predict.hpp"
#include "natlearn/random.hpp"
#include "natlearn/train.hpp"
