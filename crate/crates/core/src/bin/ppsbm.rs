fn main() {
    std::process::exit(ppsbm::cli::dispatch(std::env::args()));
}
