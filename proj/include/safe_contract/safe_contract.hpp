#pragma once

#include "safe_contract/agent.hpp"
#include "safe_contract/allocation.hpp"
#include "safe_contract/beta_curve.hpp"
#include "safe_contract/envelope.hpp"
#include "safe_contract/error.hpp"
#include "safe_contract/oracle.hpp"
#include "safe_contract/scheduler.hpp"
#include "safe_contract/single_agent.hpp"
#include "safe_contract/utility_curve.hpp"
