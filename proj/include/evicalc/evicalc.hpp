#pragma once

#include "evicalc/audit.hpp"
#include "evicalc/calculus.hpp"
#include "evicalc/engine.hpp"
#include "evicalc/errors.hpp"
#include "evicalc/io.hpp"
#include "evicalc/joint.hpp"
#include "evicalc/measure.hpp"
#include "evicalc/naive_bayes.hpp"
#include "evicalc/proposition.hpp"
#include "evicalc/scenario.hpp"
