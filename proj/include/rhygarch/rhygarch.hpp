#pragma once

#include "rhygarch/dist.hpp"
#include "rhygarch/errors.hpp"
#include "rhygarch/filter.hpp"
#include "rhygarch/fit.hpp"
#include "rhygarch/io.hpp"
#include "rhygarch/loglik.hpp"
#include "rhygarch/mc.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/optim.hpp"
#include "rhygarch/risk.hpp"
#include "rhygarch/series.hpp"
#include "rhygarch/sim.hpp"
