#pragma once

#include "qmt/error.hpp"
#include "qmt/frame.hpp"
#include "qmt/markov_tree.hpp"
#include "qmt/mass.hpp"
#include "qmt/oracle.hpp"
#include "qmt/propagation.hpp"
