#pragma once

// Umbrella header: mining, pruning and classification of class association
// rules over categorical data with a rare positive class.

#include "rarerules/bitrow.hpp"
#include "rarerules/classifier.hpp"
#include "rarerules/csv.hpp"
#include "rarerules/dataset.hpp"
#include "rarerules/mining.hpp"
#include "rarerules/pruning.hpp"
#include "rarerules/report.hpp"
#include "rarerules/schema.hpp"
#include "rarerules/serialize.hpp"
#include "rarerules/stats.hpp"
#include "rarerules/synth.hpp"
