#pragma once

#include "linflow/classifier.hpp"
#include "linflow/error.hpp"
#include "linflow/flow.hpp"
#include "linflow/homeo.hpp"
#include "linflow/ingest.hpp"
#include "linflow/invariants.hpp"
#include "linflow/jordan.hpp"
#include "linflow/probes.hpp"
#include "linflow/rational.hpp"
#include "linflow/similarity.hpp"
#include "linflow/spec_io.hpp"
