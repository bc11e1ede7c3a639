#pragma once

#include "affdim/dimensions.hpp"
#include "affdim/error.hpp"
#include "affdim/estimator.hpp"
#include "affdim/ifs.hpp"
#include "affdim/rational.hpp"
#include "affdim/separation.hpp"
#include "affdim/subsystem.hpp"
