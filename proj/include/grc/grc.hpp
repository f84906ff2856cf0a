#pragma once

#include "grc/bounds.hpp"
#include "grc/gf.hpp"
#include "grc/grc_exact.hpp"
#include "grc/grc_functional.hpp"
#include "grc/ifg.hpp"
#include "grc/io.hpp"
#include "grc/matrix.hpp"
#include "grc/mds.hpp"
#include "grc/params.hpp"
#include "grc/product_matrix.hpp"
#include "grc/rng.hpp"
#include "grc/secure.hpp"
#include "grc/simulator.hpp"
