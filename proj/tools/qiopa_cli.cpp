#include "qiopa/app/commands.hpp"

int main(int argc, char** argv) { return qiopa::app::main_entry(argc, argv); }
