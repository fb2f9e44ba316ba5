#pragma once

#include "qentropy/error.hpp"
#include "qentropy/rng.hpp"
#include "qentropy/matrix.hpp"
#include "qentropy/spectral.hpp"
#include "qentropy/tensor.hpp"
#include "qentropy/states.hpp"
#include "qentropy/functionals.hpp"
#include "qentropy/theorems.hpp"
#include "qentropy/io.hpp"
#include "qentropy/harness.hpp"
