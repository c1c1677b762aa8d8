def max_height(teams):
    return max(team.height for team in teams)
