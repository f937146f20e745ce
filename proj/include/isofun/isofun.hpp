#pragma once

#include "isofun/bilinear.hpp"
#include "isofun/core.hpp"
#include "isofun/eigen.hpp"
#include "isofun/io.hpp"
#include "isofun/matrix.hpp"
#include "isofun/opfn.hpp"
#include "isofun/parse.hpp"
#include "isofun/psi.hpp"
#include "isofun/symfn.hpp"
#include "isofun/verify.hpp"
