#pragma once

#include "natrl/agents/checkpoint.hpp"
#include "natrl/agents/exploration.hpp"
#include "natrl/agents/policy_gradient.hpp"
#include "natrl/agents/ppo.hpp"
#include "natrl/agents/replay.hpp"
#include "natrl/agents/value_learning.hpp"
#include "natrl/datasets/cifar.hpp"
#include "natrl/datasets/clips.hpp"
#include "natrl/datasets/idx.hpp"
#include "natrl/datasets/netpbm.hpp"
#include "natrl/datasets/segmentation.hpp"
#include "natrl/envs/catcher.hpp"
#include "natrl/envs/classify.hpp"
#include "natrl/envs/localize.hpp"
#include "natrl/harness/runner.hpp"
#include "natrl/harness/tools.hpp"
#include "natrl/wrappers/background.hpp"
#include "natrl/wrappers/frames.hpp"
#include "natrl/wrappers/noise.hpp"
#include "natrl/wrappers/preprocess.hpp"
