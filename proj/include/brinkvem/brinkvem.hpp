// SPDX-License-Identifier: Apache-2.0
// Umbrella header.
#pragma once

#include "brinkvem/adaptive.hpp"
#include "brinkvem/assembly.hpp"
#include "brinkvem/cases.hpp"
#include "brinkvem/core.hpp"
#include "brinkvem/errors.hpp"
#include "brinkvem/estimator.hpp"
#include "brinkvem/export.hpp"
#include "brinkvem/kappa_raster.hpp"
#include "brinkvem/mesh.hpp"
#include "brinkvem/mesh_io.hpp"
#include "brinkvem/problem.hpp"
#include "brinkvem/quadrature.hpp"
#include "brinkvem/refine.hpp"
#include "brinkvem/rt_reconstruction.hpp"
#include "brinkvem/study.hpp"
#include "brinkvem/vem_local.hpp"
