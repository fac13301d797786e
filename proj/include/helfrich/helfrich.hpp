#pragma once

#include "helfrich/core.hpp"
#include "helfrich/mesh.hpp"
#include "helfrich/curvature.hpp"
#include "helfrich/mesh_io.hpp"
#include "helfrich/varifold.hpp"
#include "helfrich/functionals.hpp"
#include "helfrich/concvol.hpp"
#include "helfrich/shapes.hpp"
#include "helfrich/liyau.hpp"
#include "helfrich/optimize.hpp"
