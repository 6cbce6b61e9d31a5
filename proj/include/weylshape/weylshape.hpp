#pragma once

#include "weylshape/error.hpp"
#include "weylshape/io.hpp"
#include "weylshape/lengthspec.hpp"
#include "weylshape/parallel.hpp"
#include "weylshape/reconstruct.hpp"
#include "weylshape/spectrum.hpp"
#include "weylshape/weyl.hpp"
