#pragma once

// Umbrella header for the simulator library. The live HTTP backend lives in
// dyta/llm/openai.hpp and is included separately.

#include "dyta/agent/agent.hpp"
#include "dyta/agent/snapshot.hpp"
#include "dyta/config/run_config.hpp"
#include "dyta/dataset/prepared.hpp"
#include "dyta/eval/harness.hpp"
#include "dyta/eval/report.hpp"
#include "dyta/fusion/rank_fusion.hpp"
#include "dyta/llm/mock.hpp"
#include "dyta/llm/replay.hpp"
#include "dyta/temporal/extractor.hpp"
