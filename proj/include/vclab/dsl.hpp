#pragma once

#include "vclab/dsl/ast.hpp"
#include "vclab/dsl/certify.hpp"
#include "vclab/dsl/eval.hpp"
#include "vclab/dsl/parser.hpp"
#include "vclab/dsl/printer.hpp"
