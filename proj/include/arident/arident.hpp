#pragma once

#include "arident/ar.hpp"
#include "arident/config.hpp"
#include "arident/errors.hpp"
#include "arident/io.hpp"
#include "arident/least_squares.hpp"
#include "arident/moments.hpp"
#include "arident/noise.hpp"
#include "arident/report.hpp"
#include "arident/system.hpp"
