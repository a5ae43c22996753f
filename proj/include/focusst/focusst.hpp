#pragma once

// Umbrella header for the whole library.

#include "focusst/analysis.hpp"
#include "focusst/ast.hpp"
#include "focusst/core.hpp"
#include "focusst/diagnostics.hpp"
#include "focusst/dot_export.hpp"
#include "focusst/json_io.hpp"
#include "focusst/message.hpp"
#include "focusst/operators.hpp"
#include "focusst/parser.hpp"
#include "focusst/printer.hpp"
#include "focusst/reference.hpp"
#include "focusst/runtime.hpp"
#include "focusst/spatial.hpp"
#include "focusst/stream.hpp"
#include "focusst/types.hpp"
