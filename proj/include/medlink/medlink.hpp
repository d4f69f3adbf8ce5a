#pragma once

// Single include for the whole library.

#include <medlink/errors.hpp>
#include <medlink/rng.hpp>
#include <medlink/model.hpp>
#include <medlink/scenario_io.hpp>
#include <medlink/analytics.hpp>
#include <medlink/path_delay.hpp>
#include <medlink/linksim.hpp>
#include <medlink/composer.hpp>
#include <medlink/report.hpp>
#include <medlink/cli.hpp>
