#pragma once

#include "hetlog/ast.hpp"
#include "hetlog/eval.hpp"
#include "hetlog/game.hpp"
#include "hetlog/kripke.hpp"
#include "hetlog/morley.hpp"
#include "hetlog/parse.hpp"
#include "hetlog/print.hpp"
#include "hetlog/proof.hpp"
#include "hetlog/structure.hpp"
#include "hetlog/syntax.hpp"
