#pragma once

// Umbrella header: the whole MWE segmentation toolkit.

#include "boundseg/annotated.hpp"
#include "boundseg/core.hpp"
#include "boundseg/corpus_io.hpp"
#include "boundseg/errors.hpp"
#include "boundseg/evaluation.hpp"
#include "boundseg/lfd.hpp"
#include "boundseg/model_io.hpp"
#include "boundseg/segmenter.hpp"
#include "boundseg/tuner.hpp"
