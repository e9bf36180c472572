#pragma once

#include "spectral.hpp"
#include "concentration.hpp"
#include "edge_detect.hpp"
#include "mollifier.hpp"
#include "burgers.hpp"
#include "pipeline.hpp"
