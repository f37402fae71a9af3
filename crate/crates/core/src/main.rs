fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter("KHLAB_LOG")).init();
    std::process::exit(khlab::cli::main_with(std::env::args()));
}
