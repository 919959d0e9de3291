#pragma once

#include "pkd/build.hpp"
#include "pkd/config.hpp"
#include "pkd/datagen.hpp"
#include "pkd/geometry.hpp"
#include "pkd/io.hpp"
#include "pkd/kdtree.hpp"
#include "pkd/node.hpp"
#include "pkd/oracle.hpp"
#include "pkd/parallel.hpp"
#include "pkd/query.hpp"
#include "pkd/rng.hpp"
#include "pkd/sieve.hpp"
#include "pkd/skeleton.hpp"
#include "pkd/update.hpp"
