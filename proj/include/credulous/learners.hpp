#pragma once

#include "credulous/learners/knn.hpp"
#include "credulous/learners/model.hpp"
#include "credulous/learners/naive_bayes.hpp"
#include "credulous/learners/one_r.hpp"
#include "credulous/learners/random_forest.hpp"
#include "credulous/learners/rep_tree.hpp"
#include "credulous/learners/spec.hpp"
#include "credulous/learners/tree.hpp"
