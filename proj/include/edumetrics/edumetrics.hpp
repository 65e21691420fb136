// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "edumetrics/catalog.hpp"
#include "edumetrics/compare.hpp"
#include "edumetrics/config.hpp"
#include "edumetrics/fixtures.hpp"
#include "edumetrics/graph.hpp"
#include "edumetrics/io.hpp"
#include "edumetrics/json_schema.hpp"
#include "edumetrics/pipeline.hpp"
#include "edumetrics/position.hpp"
#include "edumetrics/report.hpp"
#include "edumetrics/segmentation.hpp"
#include "edumetrics/structure.hpp"
#include "edumetrics/usage.hpp"
#include "edumetrics/version.hpp"
