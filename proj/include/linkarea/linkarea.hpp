#pragma once

#include "linkarea/continuation.hpp"
#include "linkarea/critical.hpp"
#include "linkarea/cyclic.hpp"
#include "linkarea/errors.hpp"
#include "linkarea/geometry.hpp"
#include "linkarea/graph.hpp"
#include "linkarea/indices.hpp"
#include "linkarea/io.hpp"
#include "linkarea/oracle.hpp"
#include "linkarea/verify.hpp"
