def max_rating(servers):
    return max(server.rating for server in servers)
