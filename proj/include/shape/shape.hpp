#pragma once

#include "shape/error.hpp"
#include "shape/geometry.hpp"
#include "shape/camera.hpp"
#include "shape/estimator.hpp"
#include "shape/baselines.hpp"
#include "shape/scenegen.hpp"
#include "shape/scene_io.hpp"
#include "shape/harness.hpp"
