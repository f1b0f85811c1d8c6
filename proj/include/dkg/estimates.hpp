#pragma once

#include "dkg/estimates/admissibility.hpp"
#include "dkg/estimates/bilinear_probe.hpp"
#include "dkg/estimates/inequality.hpp"
#include "dkg/estimates/product.hpp"
#include "dkg/estimates/space_time.hpp"
