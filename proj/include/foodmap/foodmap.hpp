#pragma once

#include "foodmap/bic.hpp"
#include "foodmap/categories.hpp"
#include "foodmap/count_table.hpp"
#include "foodmap/csv.hpp"
#include "foodmap/dag.hpp"
#include "foodmap/datetime.hpp"
#include "foodmap/errors.hpp"
#include "foodmap/export.hpp"
#include "foodmap/geo.hpp"
#include "foodmap/hashtag.hpp"
#include "foodmap/hill_climb.hpp"
#include "foodmap/hotspot.hpp"
#include "foodmap/ingest.hpp"
#include "foodmap/kde.hpp"
#include "foodmap/pipeline.hpp"
#include "foodmap/raster.hpp"
#include "foodmap/records.hpp"
#include "foodmap/rng.hpp"
#include "foodmap/synth.hpp"
#include "foodmap/timeslot.hpp"
