#pragma once

#include "gridfed/types.hpp"
#include "gridfed/sim_engine.hpp"
#include "gridfed/model.hpp"
#include "gridfed/economy.hpp"
#include "gridfed/workload.hpp"
#include "gridfed/directory.hpp"
#include "gridfed/protocol.hpp"
#include "gridfed/lrms.hpp"
#include "gridfed/superscheduler.hpp"
#include "gridfed/federation.hpp"
#include "gridfed/experiment.hpp"
