#pragma once

#include "flowloss/error.hpp"
#include "flowloss/feature_map.hpp"
#include "flowloss/flo_io.hpp"
#include "flowloss/flow_field.hpp"
#include "flowloss/loss.hpp"
#include "flowloss/patch_grid.hpp"
#include "flowloss/pgm.hpp"
#include "flowloss/preprocess.hpp"
#include "flowloss/quantize.hpp"
#include "flowloss/similarity.hpp"
#include "flowloss/tensor_file.hpp"
#include "flowloss/tiff_codec.hpp"
