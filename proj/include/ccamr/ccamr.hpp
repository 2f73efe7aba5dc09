#pragma once

#include "ccamr/bench.hpp"
#include "ccamr/construct.hpp"
#include "ccamr/errors.hpp"
#include "ccamr/model.hpp"
#include "ccamr/normal.hpp"
#include "ccamr/oracle.hpp"
#include "ccamr/pts.hpp"
#include "ccamr/solomon.hpp"
