#pragma once

#include "unibandit/kl.hpp"
#include "unibandit/envs.hpp"
#include "unibandit/isotonic.hpp"
#include "unibandit/trim_test.hpp"
#include "unibandit/policies.hpp"
#include "unibandit/bounds.hpp"
#include "unibandit/harness.hpp"
