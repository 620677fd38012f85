fn main() {
    std::process::exit(tsp_anneal::experiment::run(std::env::args_os()));
}
