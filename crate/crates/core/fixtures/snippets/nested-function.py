def main():
    import yaml
    return yaml
