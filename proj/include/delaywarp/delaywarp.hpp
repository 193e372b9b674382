#pragma once

#include "delaywarp/abel.hpp"
#include "delaywarp/config.hpp"
#include "delaywarp/dde.hpp"
#include "delaywarp/error.hpp"
#include "delaywarp/fourier.hpp"
#include "delaywarp/monotone_interp.hpp"
#include "delaywarp/periodic_delay.hpp"
#include "delaywarp/perturbation.hpp"
#include "delaywarp/random.hpp"
#include "delaywarp/robust.hpp"
#include "delaywarp/root_finding.hpp"
#include "delaywarp/time_transform.hpp"
#include "delaywarp/transform.hpp"
