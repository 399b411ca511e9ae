fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CURVEM_LOG", "warn")).init();
    std::process::exit(curvem::cli::run(std::env::args_os()));
}
