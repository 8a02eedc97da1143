#pragma once

#include "collage/errors.hpp"
#include "collage/geometry.hpp"
#include "collage/inscribed_rect.hpp"
#include "collage/delaunay.hpp"
#include "collage/raster.hpp"
#include "collage/image_io.hpp"
#include "collage/shape_model.hpp"
#include "collage/medial_axis.hpp"
#include "collage/planar_graph.hpp"
#include "collage/decomposition.hpp"
#include "collage/slicing_tree.hpp"
#include "collage/assignment.hpp"
#include "collage/compositor.hpp"
#include "collage/metrics.hpp"
#include "collage/manifest.hpp"
#include "collage/pipeline.hpp"
#include "collage/synthetic.hpp"
#include "collage/timing.hpp"
