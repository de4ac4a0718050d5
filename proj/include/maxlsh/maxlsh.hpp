#pragma once

#include "maxlsh/alsh.hpp"
#include "maxlsh/common.hpp"
#include "maxlsh/csv.hpp"
#include "maxlsh/krivine.hpp"
#include "maxlsh/matrix.hpp"
#include "maxlsh/maxnorm.hpp"
#include "maxlsh/randexp.hpp"
#include "maxlsh/ratio.hpp"
#include "maxlsh/rng.hpp"
#include "maxlsh/simcore.hpp"
#include "maxlsh/simplex.hpp"
#include "maxlsh/symcheck.hpp"
