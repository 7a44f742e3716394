#ifndef MESHDN_MESHDN_HPP
#define MESHDN_MESHDN_HPP

#include "meshdn/bench.hpp"
#include "meshdn/cholesky.hpp"
#include "meshdn/denoise.hpp"
#include "meshdn/graph.hpp"
#include "meshdn/icosphere.hpp"
#include "meshdn/mesh.hpp"
#include "meshdn/noise.hpp"
#include "meshdn/signal.hpp"
#include "meshdn/sparse.hpp"
#include "meshdn/transport.hpp"

#endif  // MESHDN_MESHDN_HPP
