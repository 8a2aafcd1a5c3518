#pragma once

// Umbrella header: pulls in the whole library in dependency order.

#include "longjump/util/checked.hpp"
#include "longjump/util/num.hpp"
#include "longjump/util/rng.hpp"
#include "longjump/util/sha256.hpp"
#include "longjump/util/csv.hpp"
#include "longjump/util/threadpool.hpp"

#include "longjump/group/element.hpp"
#include "longjump/group/group.hpp"
#include "longjump/group/subgroup.hpp"
#include "longjump/group/nilpotent.hpp"

#include "longjump/geometry/weight.hpp"
#include "longjump/geometry/phi.hpp"
#include "longjump/geometry/system.hpp"
#include "longjump/geometry/geometry.hpp"
#include "longjump/geometry/oracle.hpp"

#include "longjump/measure/measure.hpp"
#include "longjump/measure/sampler.hpp"

#include "longjump/kernel/kernel.hpp"
#include "longjump/kernel/fft.hpp"
#include "longjump/kernel/dense1d.hpp"
#include "longjump/kernel/stats.hpp"

#include "longjump/walk/walk.hpp"

#include "longjump/analysis/fit.hpp"
#include "longjump/analysis/spectral.hpp"
#include "longjump/analysis/holder.hpp"

#include "longjump/cli/config.hpp"
#include "longjump/cli/experiments.hpp"
