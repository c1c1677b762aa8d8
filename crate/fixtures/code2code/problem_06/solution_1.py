def highest_rating(servers):
    best = None
    for server in servers:
        if best is None or server.rating > best:
            best = server.rating
    return best
