fn main() {
    std::process::exit(rdf_summarize::cli::main());
}
