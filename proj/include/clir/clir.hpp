#pragma once

#include "bm25.hpp"
#include "corpus.hpp"
#include "error.hpp"
#include "expand.hpp"
#include "http.hpp"
#include "pipeline.hpp"
#include "prompt.hpp"
#include "rouge.hpp"
#include "tokenize.hpp"
#include "translate.hpp"
