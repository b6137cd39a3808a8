#pragma once

#include "lfdisp/entropy.hpp"
#include "lfdisp/errors.hpp"
#include "lfdisp/geometry.hpp"
#include "lfdisp/image.hpp"
#include "lfdisp/lightfield.hpp"
#include "lfdisp/matcher.hpp"
#include "lfdisp/metrics.hpp"
#include "lfdisp/pfm.hpp"
#include "lfdisp/pipeline.hpp"
#include "lfdisp/png_io.hpp"
#include "lfdisp/region.hpp"
#include "lfdisp/select.hpp"
#include "lfdisp/synth.hpp"
#include "lfdisp/tv.hpp"
#include "lfdisp/window.hpp"
