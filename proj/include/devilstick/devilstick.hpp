#pragma once

#include "devilstick/error.hpp"
#include "devilstick/model.hpp"
#include "devilstick/dynamics.hpp"
#include "devilstick/dvhc.hpp"
#include "devilstick/dzd.hpp"
#include "devilstick/stabilizer.hpp"
#include "devilstick/harness.hpp"
#include "devilstick/scenario.hpp"
#include "devilstick/io.hpp"
