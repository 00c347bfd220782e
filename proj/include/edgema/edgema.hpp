#pragma once

// Umbrella header for the whole library.

#include "edgema/adaptation.hpp"
#include "edgema/config.hpp"
#include "edgema/dataset.hpp"
#include "edgema/engine.hpp"
#include "edgema/error.hpp"
#include "edgema/feature_selection.hpp"
#include "edgema/forest.hpp"
#include "edgema/image.hpp"
#include "edgema/label_shift.hpp"
#include "edgema/manifest.hpp"
#include "edgema/model.hpp"
#include "edgema/synth.hpp"
#include "edgema/texture.hpp"
