def highest_height(teams):
    best = None
    for team in teams:
        if best is None or team.height > best:
            best = team.height
    return best
