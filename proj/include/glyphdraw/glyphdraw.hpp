#pragma once

#include "glyphdraw/attention.hpp"
#include "glyphdraw/bbox.hpp"
#include "glyphdraw/dataset.hpp"
#include "glyphdraw/error.hpp"
#include "glyphdraw/font.hpp"
#include "glyphdraw/glyph_condition.hpp"
#include "glyphdraw/image.hpp"
#include "glyphdraw/kernel_checks.hpp"
#include "glyphdraw/layout.hpp"
#include "glyphdraw/linalg.hpp"
#include "glyphdraw/losses.hpp"
#include "glyphdraw/metrics.hpp"
#include "glyphdraw/record.hpp"
#include "glyphdraw/rng.hpp"
#include "glyphdraw/utf8.hpp"
#include "glyphdraw/weights.hpp"
