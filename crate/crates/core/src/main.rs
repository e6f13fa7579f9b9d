fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CTAR_LOG", "warn")).init();
    std::process::exit(ctar::cli::dispatch(std::env::args_os()));
}
