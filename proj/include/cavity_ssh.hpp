// cavity_ssh.hpp: umbrella header for the numerical library (CLI plumbing
// lives under cavity_ssh/cli/ and is included separately)

#pragma once

#include "cavity_ssh/errors.hpp"
#include "cavity_ssh/model.hpp"
#include "cavity_ssh/linalg.hpp"
#include "cavity_ssh/parallel.hpp"
#include "cavity_ssh/manybody.hpp"
#include "cavity_ssh/rwa.hpp"
#include "cavity_ssh/topology.hpp"
#include "cavity_ssh/dynamics.hpp"
